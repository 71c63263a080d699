"""
Householder reflectors, unpivoted QR and compact WY application
"""
