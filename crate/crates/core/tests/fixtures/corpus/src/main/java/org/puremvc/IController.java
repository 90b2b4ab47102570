package org.puremvc;

public interface IController {
    void registerCommand(String notificationName, ICommand command);

    void executeCommand(INotification note);

    void removeCommand(String notificationName);

    boolean hasCommand(String notificationName);
}
