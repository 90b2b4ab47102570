package org.puremvc;

public class ControllerTestCommand implements ICommand {
    public ControllerTestCommand() {
    }

    public void execute(INotification note) {
        ControllerTestVO vo = (ControllerTestVO) note.getBody();
        vo.result = 2 * vo.input;
    }
}
