"""Homology of categories of flags over finite local rings and the
combinatorics of partitioned ordered sets.

Modules:

* :mod:`rbslab.ring_linalg`: finite local rings, summands and ``GL_n``.
* :mod:`rbslab.homology`: chain complexes, Smith normal form, homology.
* :mod:`rbslab.categories`: finite categories, nerves and their homology.
* :mod:`rbslab.flags_tits`: flags, Tits complexes and Steinberg modules.
* :mod:`rbslab.rbs`: the flag category with unipotent cosets and its checks.
* :mod:`rbslab.ordpm`: Ord±, partitioned ordered sets and snug partitions.
* :mod:`rbslab.cli`: batch job runner.
"""

__version__ = "0.1.0"
