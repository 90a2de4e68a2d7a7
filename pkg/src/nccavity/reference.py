"""Published benchmark values for the unit-lid cavity, keyed by source table.

Every entry carries a ``table`` tag naming where it comes from.  Values are
the printed ones; ``None`` marks cells printed as "NA" or "-".
"""
from __future__ import annotations

from types import MappingProxyType

# (velocity, pressure) dimensions of the nonconforming pair; the N=128 entry
# is printed as 32256 although 2 (N-1)^2 = 32258.
DOF_COUNTS = MappingProxyType({
    16: (450, 254),
    32: (1922, 1022),
    64: (7938, 4094),
    128: (32256, 16382),
})
DOF_TABLE = "dof-table"

PROFILE_COLUMNS = ("botella", "bruneau", "guermond", "nc256", "nc512")

# The two centerline tables are printed in a frame rotated by a quarter turn
# (lid on x=1 moving in -y).  With x' = y, y' = 1 - x the printed "u at y'=s"
# is v(1 - s, 0.5) and the printed "v at x'=s" is -u(0.5, s) in the frame used
# here (lid on y=1 moving in +x).  Rows are stored as printed; use
# ``u_profile_reference`` / ``v_profile_reference`` for lid-on-top values.

# printed "u(0.5, y)" at Re=1000
U_PROFILE_RE1000 = MappingProxyType({
    0.0312: (-0.2279225, None, -0.2279177, -0.2274204, -0.2276650),
    0.0391: (-0.2936869, -0.29330, -0.2936814, -0.2930076, -0.2933552),
    0.0469: (-0.3553213, None, -0.3553154, -0.3545665, -0.3549485),
    0.0547: (-0.4103754, -0.41018, -0.4103691, -0.4096654, -0.4100002),
    0.0937: (-0.5264392, None, -0.5264320, -0.5271749, -0.5264518),
    0.1406: (-0.4264545, -0.42645, -0.4264492, -0.4276315, -0.4265356),
    0.1953: (-0.3202137, None, -0.3202068, -0.3209943, -0.3200577),
    0.5000: (0.0257995, 0.02580, 0.0257987, 0.0256839, 0.0257175),
    0.7656: (0.3253592, None, 0.3253529, 0.3259697, 0.3252217),
    0.7734: (0.3339924, 0.33398, 0.3339860, 0.3346373, 0.3338694),
    0.8437: (0.3769189, None, 0.3769119, 0.3778450, 0.3769140),
    0.9062: (0.3330442, 0.33290, 0.3330381, 0.3339829, 0.3331021),
    0.9219: (0.3099097, None, 0.3099041, 0.3108006, 0.3099725),
    0.9297: (0.2962703, 0.29622, 0.2962650, 0.2971221, 0.2963312),
    0.9375: (0.2807056, None, 0.2807005, 0.2815029, 0.2807605),
})
U_PROFILE_TABLE = "u-centerline-Re1000"

# printed "v(x, 0.5)" at Re=1000; the nc512 entry at x=0.5 is printed with a minus sign,
# taken to be a typo and stored as printed.
V_PROFILE_RE1000 = MappingProxyType({
    0.9766: (-0.6644227, None, -0.6644194, -0.6666343, -0.6648562),
    0.9688: (-0.5808359, -0.58031, -0.5808318, -0.5831751, -0.5812660),
    0.9609: (-0.5169277, None, -0.5169214, -0.5190905, -0.5172781),
    0.9531: (-0.4723329, -0.47239, -0.4723260, -0.4741970, -0.4725743),
    0.8516: (-0.3372212, None, -0.3372128, -0.3380993, -0.3370508),
    0.7344: (-0.1886747, -0.18861, -0.1886680, -0.1890994, -0.1884232),
    0.6172: (-0.0570178, None, -0.0570151, -0.0570951, -0.0569011),
    0.5000: (0.0620561, 0.06205, 0.0620535, 0.0622962, -0.0619466),
    0.4531: (0.1081999, None, 0.1081955, 0.1085611, 0.1080176),
    0.2813: (0.2803696, 0.28040, 0.2803632, 0.2811184, 0.2802013),
    0.1719: (0.3885691, None, 0.3885624, 0.3894565, 0.3885914),
    0.1016: (0.3004561, 0.30029, 0.3004504, 0.3006758, 0.3004357),
    0.0703: (0.2228955, None, 0.2228928, 0.2228075, 0.2228534),
    0.0625: (0.2023300, 0.20227, 0.2023277, 0.2021815, 0.2022834),
    0.0547: (0.1812881, None, 0.1812863, 0.1810885, 0.1812376),
})
V_PROFILE_TABLE = "v-centerline-Re1000"


def _flip(row, sign):
    return tuple(None if v is None else sign * v for v in row)


def u_profile_reference() -> dict[float, tuple]:
    """``u(0.5, y)`` for the lid on ``y = 1``, keyed by ``y``."""
    return {y: _flip(row, -1.0) for y, row in V_PROFILE_RE1000.items()}


def v_profile_reference() -> dict[float, tuple]:
    """``v(x, 0.5)`` for the lid on ``y = 1``, keyed by ``x``."""
    return {round(1.0 - s, 4): row for s, row in U_PROFILE_RE1000.items()}

# Primary vortex of the nonconforming pair on 256x256: psi_min, omega, (x, y).
# The tabulated vorticity uses the opposite sign of curl u.
PRIMARY_VORTEX = MappingProxyType({
    100: (-0.103531, 3.16206, (0.6152, 0.7363)),
    400: (-0.114071, 2.29821, (0.5527, 0.6035)),
    1000: (-0.119186, 2.07216, (0.5293, 0.5645)),
    2500: (-0.122151, 1.98912, (0.5215, 0.5449)),
    3200: (-0.122713, 1.97778, (0.5176, 0.5410)),
    5000: (-0.123658, 1.96650, (0.5137, 0.5371)),
})
PRIMARY_VORTEX_LITERATURE = MappingProxyType({
    100: {"ghia": (-0.103423, 3.16646, (0.6172, 0.7344))},
    400: {"ghia": (-0.113909, 2.29469, (0.5547, 0.6055))},
    1000: {"erturk": (-0.118781, 2.06553, (0.5300, 0.5650)),
           "ghia": (-0.117929, 2.04968, (0.5313, 0.5625))},
    2500: {"erturk": (-0.121035, 1.96968, (0.5200, 0.5433))},
    3200: {"ghia": (-0.120377, 1.98860, (0.5165, 0.5469))},
    5000: {"erturk": (-0.121289, 1.92660, (0.5150, 0.5350)),
           "ghia": (-0.118966, 1.86016, (0.5117, 0.5352))},
})
PRIMARY_VORTEX_TABLE = "primary-vortex"

# psi_max and location of the bottom-left, bottom-right, top-left vortices.
SECONDARY_VORTICES = MappingProxyType({
    100: {"bottom_left": (1.7368e-06, (0.0332, 0.0332)),
          "bottom_right": (1.2597e-05, (0.9434, 0.0605)), "top_left": None},
    400: {"bottom_left": (1.4100e-05, (0.0488, 0.0488)),
          "bottom_right": (6.4495e-04, (0.8848, 0.1230)), "top_left": None},
    1000: {"bottom_left": (2.3223e-04, (0.0840, 0.0762)),
           "bottom_right": (1.7319e-03, (0.8652, 0.1113)), "top_left": None},
    2500: {"bottom_left": (9.2779e-04, (0.0840, 0.1113)),
           "bottom_right": (2.6661e-03, (0.8340, 0.0918)),
           "top_left": (3.3918e-04, (0.0410, 0.8887))},
    3200: {"bottom_left": (1.1104e-03, (0.0801, 0.1191)),
           "bottom_right": (2.8323e-03, (0.8223, 0.0840)),
           "top_left": (7.0750e-04, (0.0527, 0.8965))},
    5000: {"bottom_left": (1.3660e-03, (0.0723, 0.1387)),
           "bottom_right": (3.0641e-03, (0.8027, 0.0723)),
           "top_left": (1.4566e-03, (0.0645, 0.9082))},
})
SECONDARY_VORTEX_TABLE = "secondary-vortices"

# Q_u and Q_v through the cavity centre, 256x256.
FLOW_RATES = MappingProxyType({
    100: (1.9039e-16, 1.2514e-13),
    400: (2.1554e-16, 1.3347e-13),
    1000: (3.5996e-17, 1.1037e-14),
    2500: (2.4373e-16, 1.5280e-13),
    3200: (2.1814e-16, 5.1092e-14),
    5000: (3.5562e-16, 1.2311e-13),
})
FLOW_RATE_TABLE = "flow-rates"

# |int omega + 1| and max |int_Q div u|, 256x256.
INDICATORS = MappingProxyType({
    100: (2.8866e-15, 5.9605e-08),
    400: (2.2204e-16, 5.9605e-08),
    1000: (2.6645e-15, 5.9605e-08),
    2500: (1.1102e-15, 5.9605e-08),
    3200: (3.9968e-15, 5.9605e-08),
    5000: (1.4433e-15, 5.9605e-08),
})
INDICATOR_TABLE = "indicators"

PSI_CONTOUR_LEVELS = (
    -0.1175, -0.1150, -0.11, -0.1, -0.09, -0.07, -0.05, -0.03, -0.01,
    -1.0e-04, -1.0e-05, -1.0e-07, -1.0e-10, 1.0e-08, 1.0e-07,
    1.0e-06, 1.0e-05, 5.0e-05, 1.0e-04, 2.5e-04, 5.0e-04,
    1.0e-03, 1.5e-03, 3.0e-03,
)
OMEGA_CONTOUR_LEVELS = (-5.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0)
CONTOUR_TABLE = "contour-levels"
