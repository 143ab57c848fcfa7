"""Dev-only helper: build SeriesDef objects tersely for interactive checks."""
from bseries.seriesmodel import SeriesDef, parse_weight, parse_den_factors, parse_base, Position
from bseries.kernels import kernel_by_tag


def mk(base, weight="1", den="", kernel=None, pos="den", k0=0):
    br, be = parse_base(base)
    return SeriesDef(
        base_root=br,
        base_exp=be,
        kernel=kernel_by_tag(kernel) if kernel else None,
        kernel_pos=Position.NUMERATOR if pos == "num" else Position.DENOMINATOR,
        weight=parse_weight(weight),
        den_factors=parse_den_factors(den) if den else (),
        k_start=k0,
    )
