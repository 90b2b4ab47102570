package org.apache.commons.mail;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

import javax.mail.internet.MimeMessage;

public class Email {
    private String hostName;
    private int smtpPort;
    private String fromAddress;
    private List toList = new ArrayList();
    private String subject;
    private Map headers = new HashMap();
    private String charset;
    private Object content;
    private String contentType;
    private MimeMessage message;

    public void setHostName(String hostName) {
        this.hostName = hostName;
    }

    public void setSmtpPort(int port) {
        if (port < 1) {
            throw new IllegalArgumentException("Cannot connect to a port number that is less than 1");
        }
        this.smtpPort = port;
    }

    public Email setFrom(String email) {
        this.fromAddress = email;
        return this;
    }

    public Email addTo(String email) {
        toList.add(email);
        return this;
    }

    public Email setSubject(String aSubject) {
        this.subject = aSubject;
        return this;
    }

    public void addHeader(String name, String value) {
        if (name == null || value == null) {
            throw new IllegalArgumentException("name and value can not be null");
        }
        headers.put(name, value);
    }

    public Map getHeaders() {
        return headers;
    }

    public void setCharset(String newCharset) {
        this.charset = newCharset;
    }

    public void setContent(Object aObject, String aContentType) {
        this.content = aObject;
        this.contentType = aContentType;
    }

    public String getSubject() {
        return subject;
    }

    public String getHostName() {
        return hostName;
    }

    public void buildMimeMessage() {
        MimeMessage msg = new MimeMessage(hostName, smtpPort);
        msg.setFrom(fromAddress);
        for (Object to : toList) {
            msg.addRecipient(to);
        }
        msg.setSubject(subject, charset);
        msg.setContent(content, contentType);
        msg.setHeaders(headers);
        this.message = msg;
    }

    public MimeMessage getMimeMessage() {
        return message;
    }
}
