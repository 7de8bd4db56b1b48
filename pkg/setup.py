import re
from setuptools import setup

with open('README.md', 'r') as f:
    long_description = f.read()

# Read the version information from the version file
VERSION_FILE = "cfrac_spectra/_version.py"
VERSION_REGEX = r'^__version__ = [\'"]([^\'"]+)[\'"]$'
with open(VERSION_FILE, 'r') as f:
    version = f.read()
    result = re.search(VERSION_REGEX, version, re.M)
    if result:
        version = result.group(1)
    else:
        raise RuntimeError('No version string found in file %s.', VERSION_FILE)

setup(
   name='cfrac_spectra',
   version=version,
   description='Eigenvalues, eigenvectors and singular values of non-Hermitian tridiagonal operators from continued fractions',
   long_description=long_description,
   long_description_content_type='text/markdown',
   classifiers=[
    'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
    'Programming Language :: Python',
    'Development Status :: 4 - Beta',
    'Intended Audience :: Science/Research',
    'Natural Language :: English',
    'Topic :: Scientific/Engineering :: Physics',
   ],
   keywords='continued fraction non-Hermitian eigenvalues tridiagonal',
   license='GPL',
   packages=['cfrac_spectra'],
   python_requires='>=3.8',
   install_requires=['numpy>=1.20', 'async-timeout>=3.0.1', ],  # external packages as dependencies
   extras_require={
       'test': ['pytest', 'hypothesis', ],
   },
   entry_points={
       'console_scripts': ['cfrac-spectra=cfrac_spectra.cli:main', ],
   },
)
