from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="rsma-outage",
    version="0.1.0",
    description="Outage, rate and fairness analysis of two-user uplink RSMA with user scheduling: closed forms, Monte Carlo and figure experiments",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20,<3.0",
        "scipy>=1.7,<2.0",
        "pyyaml>=5.4,<7.0",
        "jsonschema>=3.2,<5.0",
        "click>=7.1.2,<9.0",
    ],
    extras_require={
        "dev": [
            "pytest>=6.2.5",
            "pytest-cov>=3.0.0",
            "pytest-mock>=3.6.1",
            "pytest-xdist>=2.4.0",
            "black>=21.9b0",
            "isort>=5.9.3",
            "flake8>=3.9.2",
            "mypy>=0.910",
        ],
        "docs": [
            "mkdocs>=1.2.3,<2.0",
            "mkdocs-material>=7.3.6,<8.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "rsma-outage=rsma_outage.cli:main",
        ],
    },
    package_data={
        "rsma_outage": ["scenarios/*.yaml"],
    },
    include_package_data=True,
)
