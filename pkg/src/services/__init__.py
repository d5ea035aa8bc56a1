"""
Services: network simulator, collectives, all-to-all encoders and the
end-to-end encoding framework.
"""
