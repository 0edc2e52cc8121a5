import java.util.Collection;
import java.util.Iterator;

public class ChartRenderer {

    private int drawn;

    public void drawAnnotations(Range r) {
        int result = 0;
        Collection c = r.getAnnotations();
        Iterator i = c.iterator();
        while (i.hasNext()) {
            Object note = i.next();
            result = result + 1;
            drawn = result;
        }
    }

    public int drawnCount() {
        return drawn;
    }

    public double upperBoundOf(Range r) {
        double result = 0.0;
        if (r != null) {
            result = r.getUpperBound();
        }
        return result;
    }
}
