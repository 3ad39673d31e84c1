"""Benchmark environments and their rollout policies."""

from . import lander, lqg, oracle, vdptag

__all__ = ["lqg", "vdptag", "lander", "oracle"]
