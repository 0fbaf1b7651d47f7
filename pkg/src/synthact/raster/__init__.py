from .render import (
    ConfigError,
    DepthSequence,
    RenderConfig,
    camera_pose_cv,
    project,
    render_clip,
    render_depth_sequence,
    render_frame,
    unproject,
)

__all__ = [
    "ConfigError",
    "DepthSequence",
    "RenderConfig",
    "camera_pose_cv",
    "project",
    "render_clip",
    "render_depth_sequence",
    "render_frame",
    "unproject",
]
