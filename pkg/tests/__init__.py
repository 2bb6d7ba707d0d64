# -*- coding: utf-8 -*-
"""
opduality Tests
"""
