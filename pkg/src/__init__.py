# Word Sense Disambiguation - Source Package
