package com.thoughtworks.xstream.persistence;

import java.util.Iterator;
import java.util.Map;

import junit.framework.TestCase;

public class XmlMapTest extends TestCase {
    private StreamStrategy strategy;

    public void testRemovesAnItemThroughIteration() {
        XmlMap map = new XmlMap(this.strategy);
        map.put("guilherme", "aCuteString");
        map.put("silveira", "anotherCuteString");
        for (Iterator iter = map.entrySet().iterator(); iter.hasNext();) {
            Map.Entry entry = (Map.Entry) iter.next();
            if (entry.getKey().equals("guilherme")) {
                iter.remove();
            }
        }
        assertFalse(map.containsKey("guilherme"));
    }

    public void testPutAndGet() {
        XmlMap map = new XmlMap(this.strategy);
        map.put("guilherme", "aCuteString");
        assertEquals("aCuteString", map.get("guilherme"));
        assertEquals(1, map.size());
    }
}
