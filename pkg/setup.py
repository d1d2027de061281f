from setuptools import find_packages, setup

setup(
    name="dnls-ist",
    version="1.0.1",
    description="Inverse scattering toolkit for the derivative nonlinear Schrodinger equation",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.26",
        "pandas>=2.1",
        "scipy>=1.12",
        "mpmath>=1.3.0",
    ],
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["dnls-ist=dnls_ist.connectors.cli:main"]},
)
