"""Published reference values for regression checks and the reproduction script.

Decimal strings are kept exactly as printed so that comparisons can be made
at the printed precision.
"""

from fractions import Fraction as F

# game -> (SS, BZ) per voter, three decimals
POWER_TABLE = {
    "[12;4,4,4,2,2,1]": (
        ("0.233", "0.233", "0.233", "0.150", "0.150", "0.000"),
        ("0.238", "0.238", "0.238", "0.143", "0.143", "0.000"),
    ),
    "[12;4,4,4,3,2,1]": (
        ("0.233", "0.233", "0.233", "0.200", "0.050", "0.050"),
        ("0.229", "0.229", "0.229", "0.188", "0.063", "0.063"),
    ),
    "[11;4,4,4,2,2,1]": (
        ("0.233", "0.233", "0.233", "0.100", "0.100", "0.100"),
        ("0.222", "0.222", "0.222", "0.111", "0.111", "0.111"),
    ),
}

GAME_COUNTS = {
    "sg": (1, 4, 18, 166, 7579, 7828352),
    "csg": (1, 3, 8, 25, 117, 1171, 44313, 16175188),
    "wvg": (1, 3, 8, 25, 117, 1111, 29373, 2730164),
}

HARD_SS_OPTIMUM = {2: F(1, 2), **{n: F(1, 3) for n in range(3, 17)}}

HARD_BZ_DECIMAL = {
    2: "0.5000000", 3: "0.4000000", 4: "0.4000000", 5: "0.3947368", 6: "0.3947368",
    7: "0.3797468", 8: "0.3797468", 9: "0.3793651", 10: "0.3793651", 11: "0.3784640",
    12: "0.3784640", 13: "0.3784399", 14: "0.3784399", 15: "0.3783563", 16: "0.3783563",
}

HARD_BZ_WITNESS = {
    2: "[1;1,0]",
    3: "[3;2,1,1]",
    4: "[3;2,1,1,0]",
    5: "[5;4,1,1,1,1]",
    6: "[5;4,1,1,1,1,0]",
    7: "[14;11,3,3,3,2,1,1]",
    8: "[14;11,3,3,3,2,1,1,0]",
    9: "[33;26,7,7,7,5,2,2,1,1]",
    10: "[33;26,7,7,7,5,2,2,1,1,0]",
    11: "[80;63,17,17,17,12,5,5,2,2,1,1]",
    12: "[80;63,17,17,17,12,5,5,2,2,1,1,0]",
    13: "[193;152,41,41,41,29,12,12,5,5,2,2,1,1]",
    14: "[193;152,41,41,41,29,12,12,5,5,2,2,1,1,0]",
    15: "[466;367,99,99,99,70,29,29,12,12,5,5,2,2,1,1]",
    16: "[466;367,99,99,99,70,29,29,12,12,5,5,2,2,1,1,0]",
}

# SS deviations for the EU instances, printed to six significant digits
EU_SS_SG = {1: "0", 2: "7.69740e-2", 3: "7.13793e-2", 4: "6.30740e-2", 5: "6.90250e-2", 6: "4.18923e-2", 7: "2.39402e-2"}
EU_SS_CSG = {
    1: "0", 2: "7.69740e-2", 3: "7.13793e-2", 4: "6.30740e-2", 5: "6.90250e-2", 6: "5.40190e-2",
    7: "3.75078e-2", 8: "1.78178e-2", 9: "6.89922e-3", 10: "3.65220e-3", 11: "1.31318e-3",
}
EU_SS_WVG = {
    1: "0", 2: "7.69740e-2", 3: "7.13793e-2", 4: "6.30740e-2", 5: "6.90250e-2", 6: "5.40190e-2",
    7: "3.75078e-2", 8: "1.78178e-2", 9: "6.89924e-3", 10: "5.35622e-3", 11: "3.62854e-3",
}
EU_SS_WVG_WITNESS = {
    1: "[1;1]",
    2: "[2;1,1]",
    3: "[2;1,1,1]",
    4: "[3;1,1,1,1]",
    5: "[4;1,1,1,1,1]",
    6: "[14;5,5,4,4,3,3]",
    7: "[18;9,8,7,7,6,5,4]",
    8: "[41;13,11,11,10,9,9,7,6]",
    9: "[92;30,27,27,26,23,22,17,16,14]",
    10: "[109;34,29,29,28,25,23,18,16,14,13]",
    11: "[339;96,82,81,80,71,65,51,44,38,36,36]",
}

CONJECTURE_RATIOS = {2: F(1, 2), 3: F(2, 5), 5: F(15, 38), 7: F(30, 79), 9: F(239, 630), 11: F(478, 1263)}

ACHIEVABLE = {
    (3, "ss"): [(1, 0, 0), (F(2, 3), F(1, 6), F(1, 6)), (F(1, 2), F(1, 2), 0), (F(1, 3), F(1, 3), F(1, 3))],
    (3, "bz"): [(1, 0, 0), (F(3, 5), F(1, 5), F(1, 5)), (F(1, 2), F(1, 2), 0), (F(1, 3), F(1, 3), F(1, 3))],
    (4, "ss"): [
        (1, 0, 0, 0),
        (F(3, 4), F(1, 12), F(1, 12), F(1, 12)),
        (F(2, 3), F(1, 6), F(1, 6), 0),
        (F(7, 12), F(1, 4), F(1, 12), F(1, 12)),
        (F(1, 2), F(1, 2), 0, 0),
        (F(1, 2), F(1, 6), F(1, 6), F(1, 6)),
        (F(5, 12), F(5, 12), F(1, 12), F(1, 12)),
        (F(5, 12), F(1, 4), F(1, 4), F(1, 12)),
        (F(1, 3), F(1, 3), F(1, 3), 0),
        (F(1, 3), F(1, 3), F(1, 6), F(1, 6)),
        (F(1, 4), F(1, 4), F(1, 4), F(1, 4)),
    ],
    (4, "bz"): [
        (1, 0, 0, 0),
        (F(7, 10), F(1, 10), F(1, 10), F(1, 10)),
        (F(3, 5), F(1, 5), F(1, 5), 0),
        (F(1, 2), F(1, 2), 0, 0),
        (F(1, 2), F(3, 10), F(1, 10), F(1, 10)),
        (F(1, 2), F(1, 6), F(1, 6), F(1, 6)),
        (F(5, 12), F(1, 4), F(1, 4), F(1, 12)),
        (F(2, 5), F(1, 5), F(1, 5), F(1, 5)),
        (F(3, 8), F(3, 8), F(1, 8), F(1, 8)),
        (F(1, 3), F(1, 3), F(1, 3), 0),
        (F(1, 3), F(1, 3), F(1, 6), F(1, 6)),
        (F(1, 4), F(1, 4), F(1, 4), F(1, 4)),
    ],
}
