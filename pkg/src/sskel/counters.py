"""Global step counter used to verify asymptotic behaviour in tests.

The counter is a plain integer bumped from the hot loops of the merge
machinery (ray-shooting steps, trapezoids built, path edges, surgery
operations).  It is cheap enough to leave always on.
"""


class StepCounter:
    __slots__ = ("steps", "trapezoids", "path_edges", "merges")

    def __init__(self):
        self.steps = 0
        self.trapezoids = 0
        self.path_edges = 0
        self.merges = 0

    def reset(self):
        self.steps = 0
        self.trapezoids = 0
        self.path_edges = 0
        self.merges = 0

    def snapshot(self):
        return {
            "steps": self.steps,
            "trapezoids": self.trapezoids,
            "path_edges": self.path_edges,
            "merges": self.merges,
        }


COUNTER = StepCounter()
