package org.apache.commons.mail;

import junit.framework.TestCase;

public abstract class AbstractEmailTest extends TestCase {
    protected String strTestMailServer = "localhost";

    protected int getMailServerPort() {
        return 2500;
    }
}
