"""Matrix completion by compression-based collaborative filtering."""

try:
    from ._kolmac import *  # noqa: F401,F403
    from ._kolmac import __version__  # noqa: F401
except ImportError:  # repo-local builds put the module next to this package
    from _kolmac import *  # noqa: F401,F403
    from _kolmac import __version__  # noqa: F401
