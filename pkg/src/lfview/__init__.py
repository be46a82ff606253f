"""Head-coupled light-field viewer.

Tracked eye positions in the camera frame select the nearest sub-aperture
views from an m x n light-field grid; the left/right pair is composited into
a red-cyan anaglyph and presented at the tracker's cadence.
"""

from .anaglyph import compose, compose_into
from .gaze import (
    EyeSample,
    GridConfig,
    SmoothingFilter,
    ViewSelection,
    map_eye_to_view,
    select_views,
)
from .lightfield import (
    LightFieldGrid,
    load_from_atlas,
    load_from_directory,
    tile_atlas,
)
from .protocol import (
    Mailbox,
    ReplaySource,
    SessionReport,
    StdinSource,
    SynthSource,
    TrajectorySpec,
    UdpSource,
    WireDecoder,
    decode_message,
    encode,
    source_run,
    synth_next,
)
from .viewer import ViewerConfig, run

__version__ = "0.1.0"
