import unittest

import numpy as np

from pinnedbeam import LinearForcing
from pinnedbeam.models import ModelName


class TestLinearForcing(unittest.TestCase):
    def test_u_independent(self):
        """Test that f = sin(x) cos t does not depend on u."""
        model = LinearForcing()
        self.assertEqual(model.model_name, ModelName.LINEAR_FORCING.value)
        t, x = 0.4, np.linspace(0.0, np.pi, 7)
        for u in (np.zeros(7), np.full(7, 3.0)):
            np.testing.assert_allclose(model.f(t, x, u), np.sin(x) * np.cos(t))
            np.testing.assert_array_equal(model.fu(t, x, u), 0.0)
        self.assertTrue(model.is_linear)


if __name__ == "__main__":
    unittest.main()
