"""lipdeg: multiscale band analysis and degree bounds for Lipschitz maps.

The package is organized by task:

* ``exterior``     -- exterior algebra, middle-degree pairing, signatures
* ``rings``        -- cohomology-style ring presentations and exponents
* ``scalability``  -- embedding searches and exact signature criteria
* ``bands``        -- dyadic band calculus for periodic grid differential forms
* ``gridio``       -- binary/CSV containers for grid forms and band profiles
* ``degbound``     -- degree integrals and the three-term multiscale bound
* ``construct``    -- explicit sphere maps, recursion plans, layered profiles
* ``cli``          -- command line front end (``lipdeg ...``)
"""

from .errors import LipdegError

__version__ = "0.1.0"

__all__ = ["LipdegError", "__version__"]
