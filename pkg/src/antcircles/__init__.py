"""Circle detection in binary edge images by ant-system graph exploration."""

from .circlefit import CircleHit, FitConfig, Rejected, circumcircle, test_loop
from .explorer import Explorer, explore
from .graph import CycleLimits, PixelGraph, assemble_loop, enumerate_cycles
from .imageio import EdgeMap, GroundTruth, load_edge_map, rasterize_circle, render_overlay
from .pipeline import DetectConfig, DetectReport, detect

__all__ = [
    "CircleHit", "CycleLimits", "DetectConfig", "DetectReport", "EdgeMap", "Explorer",
    "FitConfig", "GroundTruth", "PixelGraph", "Rejected", "assemble_loop", "circumcircle",
    "detect", "enumerate_cycles", "explore", "load_edge_map", "rasterize_circle",
    "render_overlay", "test_loop",
]
