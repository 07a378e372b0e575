import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle helper

from guidebot.session import Session
from guidebot.simrobot import SimConfig
from guidebot.sitemap import GoalPose, load_site_map
from guidebot.speechflow import load_lexicon

SAMPLE_DIR = Path(__file__).resolve().parents[1] / "sample"

START = GoalPose(floor_id="f1", cell=(1, 1), heading_rad=0.0)

SCRIPT_LINES = [
    "Hey A1, take me to the lab.",
    "#tick 3",
    "Take me to the office.",
    "#tick 2",
    "Hey A1, take me to the office.",
]


@pytest.fixture(scope="session")
def sample_map_path():
    return SAMPLE_DIR / "floorplan.json"


@pytest.fixture(scope="session")
def sample_lexicon_path():
    return SAMPLE_DIR / "lexicon.json"


@pytest.fixture(scope="session")
def sample_script_path():
    return SAMPLE_DIR / "walkabout.script"


@pytest.fixture()
def site(sample_map_path):
    return load_site_map(sample_map_path.read_text())


@pytest.fixture()
def lexicon_config(sample_lexicon_path):
    return load_lexicon(sample_lexicon_path.read_text())


@pytest.fixture()
def lexicon(lexicon_config):
    return lexicon_config.lexicon


@pytest.fixture()
def wake(lexicon_config):
    return lexicon_config.wake


@pytest.fixture()
def make_session(site, lexicon, wake):
    def build(**kwargs) -> Session:
        sim_cfg = kwargs.pop("sim_cfg", SimConfig(start=START))
        return Session(site, lexicon, wake, sim_cfg, **kwargs)

    return build


@pytest.fixture()
def session(make_session):
    return make_session()
