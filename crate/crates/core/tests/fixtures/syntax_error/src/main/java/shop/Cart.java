package shop;

public class Cart {
    private int count;

    public void add(Item item) {
        count = count + item.getQuantity();
    }

    public int getCount() {
        return count;
    }
}
