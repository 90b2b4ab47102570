package org.puremvc;

public interface IModel {
    void registerProxy(IProxy proxy);

    IProxy retrieveProxy(String proxyName);

    IProxy removeProxy(String proxyName);

    boolean hasProxy(String proxyName);
}
