from setuptools import setup

setup(
    name='quartic_spectrum',
    version='0.1',
    packages=['quartic_spectrum',
              'quartic_spectrum.models',
              'quartic_spectrum.utils'],
    package_data={'quartic_spectrum': ['data/*.yaml', 'schema/*.json']},
    install_requires=['numpy',
                      'scipy',
                      'pandas',
                      'pyyaml',
                      'sympy',
                      'mpmath',
                      'jsonschema',
                      'loguru',
                      'tqdm']
)
