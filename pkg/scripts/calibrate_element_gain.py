#!/usr/bin/env python3
"""Recompute the pencil-beam element gain constant.

Anchor: 4-element sub-arrays, 15 deg maximum opening angle, 10 m link,
0 dBm per element and the backhaul link assumptions otherwise; 15 deg is
placed exactly at the 16-QAM threshold (~229 Gbps single polarization).
The printed value, rounded up, is frozen as
``thzlink.arrays.ELEMENT_GAIN_CONSTANT``.
"""
import math

from thzlink.arrays import ELEMENT_GAIN_CONSTANT, calibrate_element_gain_constant, element_gain_dbi

kappa = calibrate_element_gain_constant()
print(f"calibrated kappa     : {kappa:.3f} deg^2 ({element_gain_dbi(15.0, kappa):.3f} dBi at 15 deg)")
print(f"frozen kappa         : {ELEMENT_GAIN_CONSTANT:.3f} deg^2")
print(f"frozen / calibrated  : {10 * math.log10(ELEMENT_GAIN_CONSTANT / kappa):+.4f} dB")
