#!/usr/bin/env python
# -*- coding: utf-8 -*-
from os import path
from setuptools import setup, find_packages

CURRENT_PATH = path.abspath(path.dirname(__file__))

with open(path.join(CURRENT_PATH, 'README.md')) as readme_file:
    readme = readme_file.read()

with open(path.join(CURRENT_PATH, 'CHANGELOG.md')) as changelog_file:
    changelog = changelog_file.read()

requirements = [
    'numpy',
    'scipy',
    'cvxpy',
    'tqdm'
]

setup(
    name='hajlasz-lab',
    version='0.1.0',
    description="Median convolutions, maximal operators and Hajlasz type spaces on finite metric measure spaces",
    long_description=readme + '\n\n' + changelog,
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.8",
    packages=find_packages(exclude=['examples', 'examples.*']),
    entry_points="""
    [console_scripts]
    hajlasz-lab=hajlaszlab.harness:main
    """,
    install_requires=requirements,
    extras_require={'test': ['pytest', 'hypothesis']},
    zip_safe=False,
    keywords='hajlasz besov triebel-lizorkin median metric-measure-space',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Mathematics'
    ]
)
