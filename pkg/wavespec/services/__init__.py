"""Estimation, Monte Carlo and artifact services"""
