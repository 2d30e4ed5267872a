import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

with open('requirements.txt') as f:
    requirements = f.read().splitlines()

setuptools.setup(
    name="bwelab",
    use_scm_version=True,
    setup_requires=['setuptools_scm'],
    author="bwelab developers",
    description="bwelab is a desk-scale laboratory for learned bandwidth estimation: "
    "simulate real-time media calls over bottleneck links, record an expert "
    "estimator, clone it into a recurrent policy and finetune it online.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests', 'tests.*']),
    include_package_data=True,
    package_data={'bwelab': ['config.json']},
    install_requires=requirements,
    python_requires='>=3.8',
    entry_points={
        'console_scripts': ['bwelab = bwelab.cli:main']
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: Implementation :: CPython",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent"
    ],
)
