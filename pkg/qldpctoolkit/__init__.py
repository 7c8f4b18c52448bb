__all__ = [
    "errors",
    "f2",
    "group_algebra",
    "complexes",
    "tanner",
    "flip_decoders",
    "product_decoders",
    "config",
    "bundle",
    "harness",
]
