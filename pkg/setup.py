from setuptools import setup, find_packages

setup(
    name="bbpsim",
    version="0.1.0",
    description="Bodyless block propagation simulator with legacy, compact and hybrid baselines",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"bbpsim": ["configs/*.json"]},
    install_requires=[
        "numpy>=1.26",
        "networkx>=3.2",
        "pydantic>=2.5",
        "python-dotenv>=1.0.0",
    ],
    tests_require=["pytest"],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
    include_package_data=True,
    entry_points={
        "console_scripts": [
            "bbpsim=bbpsim.cli:main",
        ],
    },
)
