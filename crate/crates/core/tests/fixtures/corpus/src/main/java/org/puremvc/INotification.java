package org.puremvc;

public interface INotification {
    String getName();

    Object getBody();

    void setBody(Object body);

    String getType();
}
