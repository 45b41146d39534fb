# Formulation codes understood by every kernel.
EXTRINSIC = 0
CYLINDRICAL = 1
REDUCED = 2
EQUATOR = 3

# Status codes written to info[0]; info[1], info[2] hold body indices.
OK = 0
SINGULAR = 1
POLE = 2
DOMAIN = 3
DRIFT = 4
NONFINITE = 5
PROJECTION = 6

SINGULAR_THRESHOLD = 1e-8
