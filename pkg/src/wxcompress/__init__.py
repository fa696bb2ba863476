"""Graph-spectral compression of station weather scenes.

Typical flow: parse observations (:mod:`wxcompress.metar`), build a scene
vector (:mod:`wxcompress.scene`), build the proximity graph and its Laplacian
(:mod:`wxcompress.geo_graph`), take the full eigenbasis
(:mod:`wxcompress.spectral`) and measure how much of the scene's energy a few
basis vectors capture (:mod:`wxcompress.compress`).
"""

from .compress import (analyze, classification_stats, compressibility_curve, compressibility_level,
                       dominant_vectors, ensemble_stats, reconstruct_categorical,
                       reconstruction_error_stats, synthesize, top_k)
from .geo_graph import build_graph, connected_components, haversine_mi, laplacian
from .kernels import BACKEND
from .metar import (BoundingBox, FlightCategory, StationObservation, derive_flight_category,
                    filter_observations, join_locations, parse_awc_csv, parse_metar_text)
from .persistence import load_basis, save_basis
from .scene import SceneVector, SiteIndex, WeatherQuantity, build_scene
from .spectral import GraphSpectralBasis, eigendecompose, verify_basis

__version__ = "0.1.0"
