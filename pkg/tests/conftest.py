import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def pytest_collection_modifyitems(config, items):
    # acceptance runs last so quick failures surface first
    items.sort(key=lambda item: "test_acceptance" in item.nodeid)
