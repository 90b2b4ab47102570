package org.puremvc;

public class Proxy implements IProxy {
    public static final String NAME = "Proxy";

    protected String proxyName;
    protected Object data;

    public Proxy(String proxyName, Object data) {
        this.proxyName = proxyName != null ? proxyName : NAME;
        this.data = data;
    }

    public Proxy(String proxyName) {
        this(proxyName, null);
    }

    public String getProxyName() {
        return proxyName;
    }

    public Object getData() {
        return data;
    }

    public void setData(Object data) {
        this.data = data;
    }
}
