class NoConvergence(RuntimeError):
    """An iterative routine hit its cap without meeting its stopping test.

    ``state`` carries whatever partial information the routine had, e.g.
    distance bounds or the last subgradient.
    """

    def __init__(self, message, **state):
        super().__init__(message)
        self.state = state
