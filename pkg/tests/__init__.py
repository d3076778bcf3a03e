"""Tests for ifslab."""
