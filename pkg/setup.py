"""Defines the package, tests, and dependencies."""

import os
from setuptools import Command, find_packages, setup
import shutil


def read_full_documentation(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as fin:
        return fin.read()


requirements = [
    'numpy>=1.22',
    'scipy>=1.12',
]


class CleanCommand(Command):
    """Remove build artifacts and the default output of `thermoplast run`."""

    description = 'Clean the directory of build artifacts'
    user_options = []

    ARTIFACTS = ('dist', 'build', 'thermoplast.egg-info', 'thermoplast-output')

    def initialize_options(self):
        self.root = None

    def finalize_options(self):
        self.root = os.path.dirname(os.path.abspath(__file__))

    def run(self):
        for artifact in self.ARTIFACTS:
            shutil.rmtree(os.path.join(self.root, artifact), ignore_errors=True)


setup(
    name="thermoplast",
    version="0.1.0",
    description=("A structured-grid simulator for Yosida-regularized "
                 "thermo-elasto-perfect plasticity."),
    license="MIT",
    keywords="plasticity finite-elements thermomechanics simulation",
    packages=find_packages(exclude=('tests', 'integration_tests', 'docs')),
    long_description=read_full_documentation('README.md'),
    long_description_content_type="text/markdown",
    entry_points={
        'console_scripts': [
            'thermoplast = thermoplast.driver:main',
        ],
    },
    install_requires=requirements,
    tests_require=['pytest', 'tox', 'hypothesis'] + requirements,
    python_requires='>=3.9',
    classifiers=[
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    cmdclass={
        'clean': CleanCommand,
    },
)
