# -*- coding: utf-8 -*-
"""
Tests for log module
"""
import pytest
import sys
sys.path.append("..")
from opduality.base import Check
from opduality.log import log_checks, logger, suite_context


@pytest.fixture
def records():
    captured = []
    sink = logger.add(lambda message: captured.append(message.record), level="DEBUG", format="{message}")
    yield captured
    logger.remove(sink)


def test_suite_context_tags_records(records):
    """Test suite name and seed reach the record extras"""
    with suite_context("charproj", 7):
        logger.info("inside")
    logger.info("outside")
    inside, outside = records[-2], records[-1]
    assert inside["extra"]["suite"] == "charproj" and inside["extra"]["seed"] == 7
    assert outside["extra"]["suite"] == "-"


def test_log_checks_counts_failures(records):
    """Test failed checks are logged as warnings and counted"""
    checks = [Check("ok", "", 0.0, 1.0), Check("bad", "", 2.0, 1.0)]
    assert log_checks(checks) == 1
    warnings = [r for r in records if r["level"].name == "WARNING"]
    assert len(warnings) == 1 and "bad" in warnings[0]["message"]
