"""Define common test utilities."""
from datetime import date
import os

TEST_FIRST_WEEK = date(2014, 5, 5)
TEST_WEEK = date(2014, 5, 12)

PUBLISHED_K_FACTOR = [2, 1, 1, 3, 5, 7, 5, 2, 4, 3, 2, 3, 4, 4, 3, 4]
PUBLISHED_K_RETENTION = [
    None, 76, 37, 39, 39, 40, 39, 36, 29, 42, 35, 31, 37, 43, 42, 37
]
PUBLISHED_K_GROWTH = [
    None, 79, 38, 42, 45, 48, 46, 38, 33, 46, 37, 33, 41, 48, 44, 40
]


def fixture_path(filename):
    """Return the path of a fixture."""
    return os.path.join(os.path.dirname(__file__), "fixtures", filename)


def load_fixture(filename):
    """Load a fixture."""
    with open(fixture_path(filename), encoding="utf-8") as fptr:
        return fptr.read()

# Weekly invitation activity over the same weeks. Link counts before the
# 26.05 week weren't recorded.
PUBLISHED_DIRECT_INVITES = [
    212, 32, 618, 438, 942, 595, 1494, 838, 1073, 3029, 5823, 2693, 2732, 3156,
    1129, 1683,
]
PUBLISHED_DIRECT_INVITERS = [
    14, 4, 17, 37, 41, 36, 90, 44, 80, 127, 103, 73, 52, 83, 40, 24
]
PUBLISHED_LINKS = [0, 0, 0, 10, 17, 7, 19, 23, 12, 15, 7, 7, 12, 33, 14, 15]
PUBLISHED_LINK_PUBLISHERS = [0, 0, 0, 8, 8, 3, 10, 11, 9, 10, 5, 5, 10, 28, 13, 10]
PUBLISHED_LINK_JOINS = [
    15, 7, 11, 13, 47, 81, 70, 10, 26, 29, 25, 28, 30, 35, 40, 15
]
