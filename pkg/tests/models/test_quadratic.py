import unittest

import numpy as np

from pinnedbeam import QuadraticForcing
from pinnedbeam.models import ModelName


class TestQuadraticForcing(unittest.TestCase):
    def test_defaults(self):
        """Test f = u^2 + sin(x) cos t and its u-derivatives."""
        model = QuadraticForcing()
        self.assertEqual(model.model_name, ModelName.QUADRATIC.value)
        t, x, u = 1.3, np.linspace(0.0, np.pi, 5), np.linspace(-1.0, 1.0, 5)
        np.testing.assert_allclose(model.f(t, x, u), u**2 + np.sin(x) * np.cos(t))
        np.testing.assert_allclose(model.fu(t, x, u), 2.0 * u)
        np.testing.assert_allclose(model.fuu(t, x, u), 2.0)


if __name__ == "__main__":
    unittest.main()
