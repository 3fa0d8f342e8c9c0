import os
import sys

import hypothesis
import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

np.seterr(all="warn")

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("ci", deadline=None, max_examples=500)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))
