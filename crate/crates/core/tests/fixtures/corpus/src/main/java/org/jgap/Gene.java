package org.jgap;

public interface Gene {
    Configuration getConfiguration();
}
