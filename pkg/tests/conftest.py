"""
Shared fixtures for the randUTV toolkit tests
"""

import pytest

from tests.helpers import create_test_matrix


@pytest.fixture
def random_matrix():
    return create_test_matrix
