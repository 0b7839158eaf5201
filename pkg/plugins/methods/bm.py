# plugins/methods/bm.py
from core.blockmatch import BmParams, match_bm


class Plugin:
    """Plugin block matching: SAD per view, fusion, WTA + subpiksel."""

    def __init__(self):
        self.name = "bm"
        self.description = "Block matching (stereo / multiscopic SAD)"
        self.stages = ("cost", "fusion", "wta")

    def build_params(self, args) -> BmParams:
        return BmParams.from_block_size(
            args.block_size,
            d_min=args.dmin,
            d_max=args.dmax,
            fusion=args.fusion,
            heuristic_ratio=args.heuristic_ratio,
            subpixel=not args.no_subpixel,
        )

    def match(self, mset, params, executor=None, progress=None):
        return match_bm(mset, params, executor=executor, progress=progress)
