import os

from setuptools import find_packages, setup

from nonlocaltransmission import __version__

# read the contents of your README file
this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

# allow setup.py to be run from any path
os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

setup(
    name="django-nonlocaltransmission",
    version=__version__,
    packages=find_packages(exclude=["testsite", "testsite.*"]),
    include_package_data=True,
    package_data={"nonlocaltransmission": ["configs/*.json"]},
    license="MIT",
    description=(
        "Nonlocal-fractional transmission energies, solvers and limit sweeps "
        "as a Django app"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Environment :: Console",
        "Framework :: Django",
        "Framework :: Django :: 3.1",
        "Framework :: Django :: 3.2",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires="~=3.7",
    install_requires=[
        "django>=3.1",
        "celery>=4.0.2",
        "numpy>=1.19",
        "scipy>=1.5",
        "jsonschema>=3.2",
    ],
    extras_require={"test": ["hypothesis", "coverage"]},
)
