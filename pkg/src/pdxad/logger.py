import logging

AD_LOGGER_NAME = "pdx_ad"

logger = logging.getLogger(AD_LOGGER_NAME)

logger.addHandler(logging.NullHandler())
