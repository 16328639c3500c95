"""Test suite for floodlib."""
