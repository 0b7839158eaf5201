# plugins/methods/gc.py
from core.graphcut import GcParams, match_gc


class Plugin:
    """Plugin graph cuts: energi BT + oklusi + smoothness, expansion move."""

    def __init__(self):
        self.name = "gc"
        self.description = "Graph cuts dengan penanganan oklusi (stereo / multiscopic BT)"
        self.stages = ("cost", "optimize")

    def build_params(self, args) -> GcParams:
        return GcParams(
            K=args.K,
            lambda1=args.lambda1,
            lambda2=args.lambda2,
            theta=args.theta,
            d_cutoff=args.dcutoff,
            d_min=args.dmin,
            d_max=args.dmax,
            upscale=args.upscale,
            max_sweeps=args.sweeps,
            seed=args.seed,
            fusion=args.fusion,
            heuristic_ratio=args.heuristic_ratio,
            bt_literal=args.bt_literal,
            energy_scale=args.energy_scale,
        )

    def match(self, mset, params, executor=None, progress=None):
        return match_gc(mset, params, executor=executor, progress=progress)
