package org.apache.commons.mail;

import java.net.URL;

public class EmailAttachment {
    private String name = "";
    private URL url;

    public String getName() {
        return name;
    }

    public void setName(String aName) {
        this.name = aName;
    }

    public URL getURL() {
        return url;
    }

    public void setURL(URL aUrl) {
        this.url = aUrl;
    }
}
