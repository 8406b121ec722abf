"""Tests for PointPatchRL"""
