"""Numba inner loops for triangle rasterization.

Fill rule is top-left (a pixel center exactly on an edge belongs to the
triangle only if that edge is a top or left edge), which makes shared
edges paint exactly once and output platform-identical. Interpolation
is perspective-correct via 1/z; depth is view-space meters.
"""

from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _sample_texture(tex, u, v):
    th, tw = tex.shape[0], tex.shape[1]
    # bilinear, clamp-to-edge; texel centers at integer+0.5
    x = u * tw - 0.5
    y = v * th - 0.5
    if x < 0.0:
        x = 0.0
    if x > tw - 1.0:
        x = tw - 1.0
    if y < 0.0:
        y = 0.0
    if y > th - 1.0:
        y = th - 1.0
    x0 = int(math.floor(x))
    y0 = int(math.floor(y))
    x1 = min(x0 + 1, tw - 1)
    y1 = min(y0 + 1, th - 1)
    fx = x - x0
    fy = y - y0
    out = np.empty(3)
    for c in range(3):
        a = tex[y0, x0, c] * (1.0 - fx) + tex[y0, x1, c] * fx
        b = tex[y1, x0, c] * (1.0 - fx) + tex[y1, x1, c] * fx
        out[c] = a * (1.0 - fy) + b * fy
    return out


@numba.njit(cache=True)
def rasterize_node(
    tris,
    pts,
    invz,
    depth_attr,
    wpos,
    wnrm,
    uv,
    vcol,
    use_texture,
    tex,
    dir_vec,
    dir_intensity,
    dir_color,
    pt_pos,
    pt_intensity,
    pt_color,
    ambient,
    shadow_depth,
    shadow_mat,
    shadow_bias0,
    shadow_bias1,
    has_shadow,
    ortho,
    depth_only,
    color_buf,
    depth_buf,
    far,
):
    height, width = depth_buf.shape
    n_dir = dir_vec.shape[0]
    n_pt = pt_pos.shape[0]
    s_res = shadow_depth.shape[0]

    for t in range(tris.shape[0]):
        i0, i1, i2 = tris[t, 0], tris[t, 1], tris[t, 2]
        x0, y0 = pts[i0, 0], pts[i0, 1]
        x1, y1 = pts[i1, 0], pts[i1, 1]
        x2, y2 = pts[i2, 0], pts[i2, 1]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 < 0.0:
            i1, i2 = i2, i1
            x1, y1, x2, y2 = x2, y2, x1, y1
            area2 = -area2
        if area2 < 1e-14:
            continue

        min_x = min(x0, min(x1, x2))
        max_x = max(x0, max(x1, x2))
        min_y = min(y0, min(y1, y2))
        max_y = max(y0, max(y1, y2))
        jx0 = max(0, int(math.ceil(min_x - 0.5)))
        jx1 = min(width - 1, int(math.floor(max_x - 0.5)))
        jy0 = max(0, int(math.ceil(min_y - 0.5)))
        jy1 = min(height - 1, int(math.floor(max_y - 0.5)))
        if jx1 < jx0 or jy1 < jy0:
            continue

        # edge k runs opposite vertex k; top-left inclusivity per edge
        ax0, ay0, bx0, by0 = x1, y1, x2, y2  # edge 0: v1 -> v2
        ax1, ay1, bx1, by1 = x2, y2, x0, y0  # edge 1: v2 -> v0
        ax2, ay2, bx2, by2 = x0, y0, x1, y1  # edge 2: v0 -> v1
        d0x, d0y = bx0 - ax0, by0 - ay0
        d1x, d1y = bx1 - ax1, by1 - ay1
        d2x, d2y = bx2 - ax2, by2 - ay2
        incl0 = (d0y == 0.0 and d0x > 0.0) or d0y < 0.0
        incl1 = (d1y == 0.0 and d1x > 0.0) or d1y < 0.0
        incl2 = (d2y == 0.0 and d2x > 0.0) or d2y < 0.0

        iz0, iz1, iz2 = invz[i0], invz[i1], invz[i2]

        for py in range(jy0, jy1 + 1):
            cy = py + 0.5
            for px in range(jx0, jx1 + 1):
                cx = px + 0.5
                e0 = d0x * (cy - ay0) - d0y * (cx - ax0)
                e1 = d1x * (cy - ay1) - d1y * (cx - ax1)
                e2 = d2x * (cy - ay2) - d2y * (cx - ax2)
                if not ((e0 > 0.0 or (e0 == 0.0 and incl0))
                        and (e1 > 0.0 or (e1 == 0.0 and incl1))
                        and (e2 > 0.0 or (e2 == 0.0 and incl2))):
                    continue
                w0 = e0 / area2
                w1 = e1 / area2
                w2 = e2 / area2
                if ortho:
                    depth = w0 * depth_attr[i0] + w1 * depth_attr[i1] + w2 * depth_attr[i2]
                    f0, f1, f2 = w0, w1, w2
                else:
                    iz = w0 * iz0 + w1 * iz1 + w2 * iz2
                    if iz <= 0.0:
                        continue
                    depth = 1.0 / iz
                    f0 = w0 * iz0 / iz
                    f1 = w1 * iz1 / iz
                    f2 = w2 * iz2 / iz
                if depth > far or depth >= depth_buf[py, px]:
                    continue
                depth_buf[py, px] = depth
                if depth_only:
                    continue

                # interpolated world position / normal
                wx = f0 * wpos[i0, 0] + f1 * wpos[i1, 0] + f2 * wpos[i2, 0]
                wy = f0 * wpos[i0, 1] + f1 * wpos[i1, 1] + f2 * wpos[i2, 1]
                wz = f0 * wpos[i0, 2] + f1 * wpos[i1, 2] + f2 * wpos[i2, 2]
                nx = f0 * wnrm[i0, 0] + f1 * wnrm[i1, 0] + f2 * wnrm[i2, 0]
                ny = f0 * wnrm[i0, 1] + f1 * wnrm[i1, 1] + f2 * wnrm[i2, 1]
                nz = f0 * wnrm[i0, 2] + f1 * wnrm[i1, 2] + f2 * wnrm[i2, 2]
                nlen = math.sqrt(nx * nx + ny * ny + nz * nz)
                if nlen > 1e-12:
                    nx /= nlen
                    ny /= nlen
                    nz /= nlen

                if use_texture:
                    su = f0 * uv[i0, 0] + f1 * uv[i1, 0] + f2 * uv[i2, 0]
                    sv = f0 * uv[i0, 1] + f1 * uv[i1, 1] + f2 * uv[i2, 1]
                    albedo = _sample_texture(tex, su, sv)
                else:
                    albedo = np.empty(3)
                    for c in range(3):
                        albedo[c] = f0 * vcol[i0, c] + f1 * vcol[i1, c] + f2 * vcol[i2, c]

                r = ambient[0] * albedo[0]
                g = ambient[1] * albedo[1]
                b = ambient[2] * albedo[2]

                for li in range(n_dir):
                    ndl = -(nx * dir_vec[li, 0] + ny * dir_vec[li, 1] + nz * dir_vec[li, 2])
                    if ndl <= 0.0:
                        continue
                    lit = 1.0
                    if has_shadow and li == 0 and s_res > 1:
                        su_s = shadow_mat[0, 0] * wx + shadow_mat[0, 1] * wy + shadow_mat[0, 2] * wz + shadow_mat[0, 3]
                        sv_s = shadow_mat[1, 0] * wx + shadow_mat[1, 1] * wy + shadow_mat[1, 2] * wz + shadow_mat[1, 3]
                        sd_s = shadow_mat[2, 0] * wx + shadow_mat[2, 1] * wy + shadow_mat[2, 2] * wz + shadow_mat[2, 3]
                        sj = int(math.floor(su_s))
                        si = int(math.floor(sv_s))
                        if 0 <= si < s_res and 0 <= sj < s_res:
                            bias = shadow_bias0 + shadow_bias1 * (1.0 - ndl)
                            if sd_s - bias > shadow_depth[si, sj]:
                                lit = 0.0
                    w = lit * ndl * dir_intensity[li]
                    r += w * dir_color[li, 0] * albedo[0]
                    g += w * dir_color[li, 1] * albedo[1]
                    b += w * dir_color[li, 2] * albedo[2]

                for li in range(n_pt):
                    dvx = wx - pt_pos[li, 0]
                    dvy = wy - pt_pos[li, 1]
                    dvz = wz - pt_pos[li, 2]
                    dist = math.sqrt(dvx * dvx + dvy * dvy + dvz * dvz)
                    if dist < 1e-9:
                        continue
                    ndl = -(nx * dvx + ny * dvy + nz * dvz) / dist
                    if ndl <= 0.0:
                        continue
                    w = ndl * pt_intensity[li]
                    r += w * pt_color[li, 0] * albedo[0]
                    g += w * pt_color[li, 1] * albedo[1]
                    b += w * pt_color[li, 2] * albedo[2]

                color_buf[py, px, 0] = min(max(r, 0.0), 1.0)
                color_buf[py, px, 1] = min(max(g, 0.0), 1.0)
                color_buf[py, px, 2] = min(max(b, 0.0), 1.0)


@numba.njit(cache=True)
def integrate_tsdf_kernel(
    tsdf,
    weight,
    color,
    origin,
    voxel,
    trunc,
    depth_m,
    rgb,
    t_cam_world,
    fx,
    fy,
    cx,
    cy,
    max_weight,
):
    """Fuse one depth frame into a dense TSDF grid (weighted average)."""
    nx, ny, nz = tsdf.shape
    height, width = depth_m.shape
    r00, r01, r02, t0 = t_cam_world[0, 0], t_cam_world[0, 1], t_cam_world[0, 2], t_cam_world[0, 3]
    r10, r11, r12, t1 = t_cam_world[1, 0], t_cam_world[1, 1], t_cam_world[1, 2], t_cam_world[1, 3]
    r20, r21, r22, t2 = t_cam_world[2, 0], t_cam_world[2, 1], t_cam_world[2, 2], t_cam_world[2, 3]
    for ix in range(nx):
        px = origin[0] + ix * voxel
        for iy in range(ny):
            py = origin[1] + iy * voxel
            for iz in range(nz):
                pz = origin[2] + iz * voxel
                zc = r20 * px + r21 * py + r22 * pz + t2
                if zc <= 1e-4:
                    continue
                xc = r00 * px + r01 * py + r02 * pz + t0
                yc = r10 * px + r11 * py + r12 * pz + t1
                u = fx * xc / zc + cx
                v = fy * yc / zc + cy
                j = int(math.floor(u + 0.5))
                i = int(math.floor(v + 0.5))
                if i < 0 or i >= height or j < 0 or j >= width:
                    continue
                d = depth_m[i, j]
                if d <= 0.0:
                    continue
                sdf = d - zc
                if sdf < -trunc:
                    continue
                s = sdf if sdf < trunc else trunc
                w_old = weight[ix, iy, iz]
                w_new = w_old + 1.0
                tsdf[ix, iy, iz] = (tsdf[ix, iy, iz] * w_old + s) / w_new
                for c in range(3):
                    color[ix, iy, iz, c] = (color[ix, iy, iz, c] * w_old + rgb[i, j, c]) / w_new
                weight[ix, iy, iz] = w_new if w_new < max_weight else max_weight
