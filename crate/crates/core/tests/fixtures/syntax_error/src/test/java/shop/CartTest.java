package shop;

import junit.framework.TestCase;

public class CartTest extends TestCase {
    public void testAdd() {
        Cart cart = new Cart();
        cart.add(new Item(2));
        assertEquals(2, cart.getCount());
    }
}
