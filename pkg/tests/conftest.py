import hypothesis

# Property tests drive the numba kernels; first-call JIT compilation would
# trip the default per-example deadline, and the suite is deterministic anyway.
hypothesis.settings.register_profile("solver", deadline=None, max_examples=50)
hypothesis.settings.load_profile("solver")
