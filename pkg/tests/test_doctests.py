import doctest

import psodkit.abelian
import psodkit.factorial


def test_doctests():
    for module in (psodkit.factorial, psodkit.abelian):
        failures, _ = doctest.testmod(module)
        assert failures == 0
