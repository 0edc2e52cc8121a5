public class LineJoiner {

    public String joinWords(String[] words) {
        StringBuilder sb = new StringBuilder();
        for (int k = 0; k < words.length; k = k + 1) {
            sb.append(words[k]);
            sb.append(" ");
        }
        return sb.toString().trim();
    }
}
